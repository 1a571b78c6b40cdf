# Configuration file for the Sphinx documentation builder.

import os
import sys

sys.path.insert(0, os.path.abspath("../.."))


# -- Project information -----------------------------------------------------

project = "kinquant"
release = "0.1.0"


# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.coverage",
    "sphinx.ext.napoleon",
    "recommonmark",
    "matplotlib.sphinxext.plot_directive",
    "sphinx.ext.autosummary",
]

templates_path = ["_templates"]
exclude_patterns = []
autosummary_generate = True
add_module_names = False


# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"
