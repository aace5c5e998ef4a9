# Tests for mixtrace
