import random
from dataclasses import replace

from certifier import certify_prime
from python.helpers.cert_cache import CertificateCache
from python.helpers.errors import CacheCorruptionError
from python.helpers.print_style import PrintStyle
from python.helpers.tool import Tool, Response


class Cache(Tool):

    async def execute(self, **kwargs) -> Response:
        cache = CertificateCache(self.config.cache_dir)
        command = self.args["cache_command"]
        if command == "list":
            return self.list_entries(cache)
        if command == "verify":
            return self.verify(cache)
        removed = cache.clear()
        PrintStyle.success(f"removed {removed} certificates from {cache.directory}")
        return Response(message=str(removed))

    def list_entries(self, cache: CertificateCache) -> Response:
        lines = []
        for entry in cache.entries():
            try:
                verdict = cache.read(entry.path).verdict.value
            except CacheCorruptionError as e:
                PrintStyle.error(str(e))
                verdict = "CORRUPT"
            lines.append(f"{entry.p}\t{entry.parameters.cache_key()}\t{verdict}")
        return Response(message="\n".join(lines))

    def verify(self, cache: CertificateCache) -> Response:
        """Recompute a seeded random sample and diff it against the stored files."""
        entries = cache.entries()
        if not entries:
            PrintStyle.hint("cache is empty")
            return Response(message="")
        fraction = float(self.args.get("fraction") or self.config.verify_fraction)
        count = min(len(entries), max(1, round(fraction * len(entries))))
        sample = random.Random(int(self.args.get("seed", 0))).sample(entries, count)

        problems = []
        for entry in sorted(sample, key=lambda e: e.p):
            try:
                stored = cache.read(entry.path)
            except CacheCorruptionError as e:
                PrintStyle.error(str(e))
                problems.append(f"{entry.p}\tcorrupt")
                continue
            config = replace(
                self.config,
                level=entry.parameters.level,
                precision=entry.parameters.precision,
                degree_cap=entry.parameters.degree_cap,
                witnesses=entry.parameters.witnesses,
            )
            fresh = certify_prime(entry.p, config)
            if fresh.to_json() != stored.to_json():
                PrintStyle.error(f"p={entry.p}: recomputed certificate differs from {entry.path}")
                problems.append(f"{entry.p}\tdiffers")

        PrintStyle.info(f"verified {count} of {len(entries)} certificates, {len(problems)} problems")
        return Response(message="\n".join(problems), exit_code=1 if problems else 0)
