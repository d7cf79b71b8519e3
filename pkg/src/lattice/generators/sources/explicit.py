"""JSON 配置描述的群图"""

from ...builder import parse_config
from ...models import GeneratorSpec, GraphOfGroups
from ..base import BaseGenerator


class ExplicitGenerator(BaseGenerator):
    """从配置文本读取"""

    @property
    def kind(self) -> str:
        return "explicit"

    def build(self, spec: GeneratorSpec) -> GraphOfGroups:
        return parse_config(spec.config_text or "")
