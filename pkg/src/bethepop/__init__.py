"""Bethe ansatz populations: exact reproduction, Weyl labels, Gaudin checks."""
