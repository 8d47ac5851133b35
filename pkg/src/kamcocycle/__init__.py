"""Constructive almost-reducibility of quasiperiodic sl(2,R) cocycles."""
