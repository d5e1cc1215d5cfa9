from .svg import render_plot
