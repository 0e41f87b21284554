int x = 1;