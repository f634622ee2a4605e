import typer
from dotenv import load_dotenv

from rsv.cli.cache import cache_command
from rsv.cli.reproduce import reproduce_command
from rsv.cli.sample import sample_command
from rsv.cli.validate import validate_command
from rsv.cli.verify import verify_command

app = typer.Typer(
    name="rsv",
    help="Distributionally robust reach-avoid safety verification for MDPs.",
    add_completion=False,
)

app.command("verify")(verify_command)
app.command("sample")(sample_command)
app.command("reproduce")(reproduce_command)
app.command("validate")(validate_command)
app.command("cache")(cache_command)


def main():
    load_dotenv()
    app()
