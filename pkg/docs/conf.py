#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# radmab documentation build configuration file.

import os
import re

extensions = ['sphinx.ext.autodoc',
    'sphinx.ext.mathjax',
    'sphinx.ext.napoleon',
    'sphinx.ext.viewcode']

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'radmab'
copyright = '2019, radmab developers'
author = 'radmab developers'

here = os.path.abspath(os.path.dirname(__file__))
with open(os.path.join(here, '..', 'radmab', '__init__.py')) as f:
    version = re.search(r"^__version__ = '([^']+)'", f.read(), re.M).group(1)
release = version

language = None
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
pygments_style = 'sphinx'
todo_include_todos = False

html_theme = "sphinx_rtd_theme"
html_static_path = []
htmlhelp_basename = 'radmabdoc'

latex_documents = [
    (master_doc, 'radmab.tex', 'radmab Documentation',
     'radmab developers', 'manual'),
]
man_pages = [
    (master_doc, 'radmab', 'radmab Documentation',
     [author], 1)
]
