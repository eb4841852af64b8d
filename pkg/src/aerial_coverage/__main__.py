from .io_cli.cli import main

main()
