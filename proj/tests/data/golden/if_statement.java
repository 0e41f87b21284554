class A { void m() { if (x) { y(); } } }