"""Instance files and recipes required in testing."""
