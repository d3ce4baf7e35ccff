collect_ignore = ['setup.py', 'docs', 'examples']
