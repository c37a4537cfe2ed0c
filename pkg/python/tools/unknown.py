from python.helpers.tool import Tool, Response


class Unknown(Tool):
    async def execute(self, **kwargs):
        return Response(
            message="",
            exit_code=2,
        )

    async def before_execution(self, **kwargs):
        from python.helpers.print_style import PrintStyle

        PrintStyle.error(f"unknown command '{self.name}'; expected check, scan, koszul or cache")
