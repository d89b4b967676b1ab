from twinterf.cli import main
main()
