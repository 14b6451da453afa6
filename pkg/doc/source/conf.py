# -*- coding: utf-8 -*-
#
# aircon documentation build configuration file.

import os
import sys

import sphinx_rtd_theme

sys.path.insert(0, os.path.abspath(os.path.join('..', '..')))

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
]

templates_path = []
source_suffix = '.rst'
master_doc = 'index'

project = 'aircon'
copyright = '2026, the aircon developers'

version = open(
    os.path.join(os.path.dirname(__file__), '..', '..', 'VERSION'),
).read().strip()
release = version

exclude_patterns = []
pygments_style = 'sphinx'

html_theme = 'sphinx_rtd_theme'
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]
htmlhelp_basename = 'aircondoc'

man_pages = [
    ('index', 'aircon', 'aircon Documentation',
     ['the aircon developers'], 1)
]

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable', None),
}

autoclass_content = 'both'
