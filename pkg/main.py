"""
Entry point for running the analyzer from a source checkout:

    python main.py analyze --matrix fixtures/remark23.csv --tie-tol 5e-4
"""

from sparsecert.cli import main

if __name__ == "__main__":
    main()
