#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# flake8: noqa W191

extensions = [
	'sphinx.ext.autodoc',
	'sphinx.ext.doctest',
	'sphinx.ext.intersphinx',
	'sphinx.ext.mathjax',
	'jaraco.packaging.sphinx',
	'rst.linker',
]

master_doc = 'index'

autodoc_member_order = 'bysource'

intersphinx_mapping = {
	'python': ('https://docs.python.org/3', None),
	'numpy': ('https://numpy.org/doc/stable', None),
	'scipy': ('https://docs.scipy.org/doc/scipy', None),
}

link_files = {
	'../CHANGES.rst': dict(
		using=dict(
			GH='https://github.com',
		),
		replace=[
			dict(
				pattern=r'^(?m)((?P<scm_version>v?\d+(\.\d+){1,2}))\n[-=]+\n',
				with_scm='{text}\n{rev[timestamp]:%d %b %Y}\n',
			),
		],
	),
}
