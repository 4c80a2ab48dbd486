from pec.cli import main

main()
