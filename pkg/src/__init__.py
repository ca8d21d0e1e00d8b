"""Hitting-time analysis and strategy search for Stackelberg patrolling."""
