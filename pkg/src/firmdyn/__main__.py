from firmdyn.cli import main

main()
