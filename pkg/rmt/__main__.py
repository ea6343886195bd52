# rmt/__main__.py
from rmt.app import main

if __name__ == "__main__":
    main(prog_name="rmt")
