"""
src/writers/report_writer.py

Text reports rendered with jinja2: the verification summary printed by
`verify` and the INDEX.md written next to a figure bundle.
"""

from pathlib import Path
from typing import Dict, List

from jinja2 import DictLoader, Environment
from loguru import logger

from src.core.sweep import SweepResult
from src.settings import CODE_VERSION


class ReportWriter:
    def __init__(self):
        self.env = Environment(
            loader=DictLoader(self._create_templates()),
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
        )

    def render(self, template: str, **kwargs) -> str:
        return self.env.get_template(template).render(version=CODE_VERSION, **kwargs)

    def verify_summary(self, checks: List, quick: bool) -> str:
        passed = sum(1 for c in checks if c.passed)
        return self.render("verify.txt", checks=checks, passed=passed, total=len(checks), quick=quick)

    def write_bundle_index(self, out_dir: Path, bundles: Dict[str, Dict[str, SweepResult]],
                           files: Dict[str, str]) -> Path:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / "INDEX.md"
        path.write_text(self.render("index.md", bundles=bundles, files=files), encoding="utf-8")
        logger.info(f"Wrote bundle index {path}")
        return path

    @staticmethod
    def _create_templates() -> Dict[str, str]:
        verify_txt = """\
magnon-squeeze-cooling {{ version }} verification{% if quick %} (quick){% endif %}

{% for check in checks %}
[{{ "PASS" if check.passed else "FAIL" }}] {{ check.name }} ({{ "%.2f"|format(check.elapsed) }} s)
       {{ check.detail }}
{% endfor %}

{{ passed }}/{{ total }} criteria passed
"""

        index_md = """\
# Figure datasets

Generated by magnon-squeeze-cooling {{ version }}. Frequencies and rates are in
units of the mechanical frequency; every CSV repeats its fixed parameters in
its `#` header.

{% for which, bundle in bundles.items() %}
## {{ which }}

| dataset | variable | points | squeezing | unstable points |
|---|---|---|---|---|
{% for label, result in bundle.items() %}
| [{{ label }}]({{ files[label] }}) | {{ result.spec.variable }} | {{ result.rows|length }} | {{ result.spec.squeezing_mode }} | {{ result.rows|selectattr("stable", "false")|list|length }} |
{% endfor %}

{% endfor %}
"""
        return {"verify.txt": verify_txt, "index.md": index_md}
