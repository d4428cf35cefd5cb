from timepop.cli import main

main()
