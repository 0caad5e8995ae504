from hrg.cli import entry

entry()
