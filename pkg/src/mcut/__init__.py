"""Approximate minimum multicut on bounded-treewidth graphs."""
