"""
Create app instance; run as ``python app.py <command> ...`` (or through
``flask --app app <command> ...``).
"""

from create_app import Config, create_app


app = create_app(Config())

if __name__ == "__main__":
    app.cli.main(prog_name="cbvf")
