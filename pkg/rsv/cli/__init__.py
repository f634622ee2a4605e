from rsv.cli.app import app, main
