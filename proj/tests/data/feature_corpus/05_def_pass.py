def f(): pass