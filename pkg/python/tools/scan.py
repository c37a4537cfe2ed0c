import asyncio
from concurrent.futures import ProcessPoolExecutor

import sympy

from certifier import CertifierConfig, certify_prime
from python.helpers.cert_cache import CertificateCache
from python.helpers.certificate import (
    PrimeCertificate,
    ScanReport,
    ScanSummary,
    render_csv,
)
from python.helpers.errors import ParameterError
from python.helpers.print_style import PrintStyle
from python.helpers.tool import Tool, Response


def _init_worker():
    # one HTML log per run, written by the parent
    PrintStyle.html_enabled = False


async def certify_many(primes: list[int], config: CertifierConfig) -> list[PrimeCertificate]:
    """Certificates for `primes` in the given order, computed on `config.jobs` processes."""
    if config.jobs <= 1:
        return [certify_prime(p, config) for p in primes]
    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=config.jobs, initializer=_init_worker) as pool:
        futures = [loop.run_in_executor(pool, certify_prime, p, config) for p in primes]
        return list(await asyncio.gather(*futures))


class Scan(Tool):

    async def execute(self, **kwargs) -> Response:
        p_max = int(self.args["p_max"])
        if p_max < 5:
            raise ParameterError(f"scan bound must be at least 5, got {p_max}")
        primes = [int(p) for p in sympy.primerange(3, p_max + 1)]
        parameters = self.config.parameters()
        cache = None if self.config.no_cache else CertificateCache(self.config.cache_dir)

        certs: dict[int, PrimeCertificate] = {}
        missing = []
        for p in primes:
            cert = cache.load(p, parameters) if cache else None
            if cert is None:
                missing.append(p)
            else:
                certs[p] = cert
        PrintStyle.info(f"{len(primes)} primes up to {p_max}, {len(certs)} cached, {len(missing)} to certify")

        for cert in await certify_many(missing, self.config):
            certs[cert.p] = cert
            if cache:
                cache.store(cert)

        ordered = [certs[p] for p in primes]
        summary = ScanSummary.from_certificates(ordered)
        PrintStyle.success(
            f"regular {summary.regular}/{summary.total} ({summary.regular_fraction:.3f}), "
            f"condition (1) {summary.condition1_fraction:.3f}, certified {summary.certified_fraction:.3f}"
        )
        PrintStyle.info(f"index of irregularity histogram: {summary.index_histogram}")

        if self.config.output_format == "csv":
            return Response(message=render_csv(ordered))
        return Response(message=ScanReport(summary=summary, certificates=ordered).to_json())
