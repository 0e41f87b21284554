class A { }