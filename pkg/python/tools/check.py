from certifier import certify_cached
from python.helpers.certificate import render_certificates
from python.helpers.print_style import PrintStyle
from python.helpers.tool import Tool, Response


class Check(Tool):

    async def execute(self, **kwargs) -> Response:
        p = int(self.args["p"])
        cert = certify_cached(p, self.config)
        if cert.failing_stage:
            PrintStyle.warning(f"p={p}: {cert.verdict.value}, stage '{cert.failing_stage}' ran out of precision")
        else:
            PrintStyle.success(f"p={p}: {cert.verdict.value}")
        return Response(message=render_certificates([cert], self.config.output_format))
