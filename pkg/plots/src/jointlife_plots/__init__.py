"""Figure regeneration from jointlife CSV artifacts."""

from .render import main, render_fig1, render_fig2, render_fig3, render_fig4
from .tables import SchemaError, assert_row_ordering, load_samples, load_table

__all__ = ["main", "render_fig1", "render_fig2", "render_fig3", "render_fig4",
           "SchemaError", "assert_row_ordering", "load_samples", "load_table"]
__version__ = "0.1.0"
