from afmllg.cli import main

main()
