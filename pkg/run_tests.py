import sys
import unittest

if __name__ == "__main__":
    # optional argument: pattern of the test modules, e.g. "test_wwsim*"
    pattern = sys.argv[1] if len(sys.argv) > 1 else "test*.py"
    test_suite = unittest.TestLoader().discover("tests", pattern=pattern)
    test_runner = unittest.TextTestRunner(verbosity=2)
    result = test_runner.run(test_suite)
    sys.exit(0 if result.wasSuccessful() else 1)
