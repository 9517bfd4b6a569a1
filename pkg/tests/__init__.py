"""Test package for ftfgates."""
