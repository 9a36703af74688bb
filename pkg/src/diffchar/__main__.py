from diffchar.cli import main

main()
