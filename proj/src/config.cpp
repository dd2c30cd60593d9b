namespace normsolve {}
