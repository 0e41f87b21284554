class { int = ; void m( {
