"""Lazy automata and the constructions built on them."""
