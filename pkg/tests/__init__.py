"""Tests for flagcert."""
