"""Documentation builder configuration."""
import os

_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
with open(os.path.join(_root, "VERSION")) as _f:
    release = _f.read().strip()
version = ".".join(release.split(".")[:2])

project = "hybridgbs"
copyright = "hybridgbs contributors"
author = "hybridgbs contributors"

extensions = []
templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"
exclude_patterns = ["_build"]
pygments_style = "sphinx"

html_theme = "default"
html_static_path = ["_static"]
htmlhelp_basename = "hybridgbsdoc"

man_pages = [("index", "hybridgbs", "Gaussian boson sampling from hybrid atom-photon systems", [author], 1)]
