extensions = ["gpdsite.sphinxext"]

master_doc = "index"
exclude_patterns = ["_build"]

# removes most of the HTML
html_theme = "basic"

gpdsite_report_format = "machine"
gpdsite_sheaf_points = 2
