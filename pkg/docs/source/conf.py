# Configuration file for the Sphinx documentation builder.
#
# For the full list of built-in configuration values, see the documentation:
# https://www.sphinx-doc.org/en/master/usage/configuration.html

import os
import sys
import datetime

sys.path.insert(0, os.path.abspath("../.."))

import importlib.metadata as metadata

# -- Project information -----------------------------------------------------

project = "anisoqed"
current_year = datetime.date.today().year
copyright = f"2024-{current_year}, anisoqed developers"
author = "anisoqed developers"
try:
    release = metadata.version("anisoqed")
except metadata.PackageNotFoundError:
    with open(os.path.join(os.path.dirname(__file__), "..", "..", "VERSION")) as f:
        release = f.read().strip()
language = "en"

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.napoleon",
    "sphinx.ext.viewcode",
    "sphinx.ext.mathjax",
]

templates_path = ["_templates"]
source_suffix = [".rst"]
exclude_patterns = []

autosummary_generate = True
napoleon_numpy_docstring = True

# -- Options for HTML output -------------------------------------------------

html_theme = "alabaster"
html_theme_options = {
    "description": "quantized modes in bi-anisotropic media",
}
