from dataclasses import dataclass

from python.helpers.cert_cache import CertificateCache
from python.helpers.certificate import (
    Parameters,
    PrimeCertificate,
    VandiverRecord,
    Verdict,
    WitnessRecord,
)
from python.helpers.irregular import check_odd_prime, irregular_indices
from python.helpers.lfunc import condition2
from python.helpers.print_style import PrintStyle
from python.helpers.vandiver import VandiverStatus, vandiver_outcome


@dataclass
class CertifierConfig:
    level: int = 1
    precision: int = 2
    degree_cap: int = 8
    witnesses: int = 8
    output_format: str = "json"
    cache_dir: str = "tmp/certificates"
    jobs: int = 1
    no_cache: bool = False
    koszul_level: int = 1
    koszul_max_level: int = 4
    verify_fraction: float = 0.05

    def parameters(self) -> Parameters:
        return Parameters(
            level=self.level,
            precision=self.precision,
            degree_cap=self.degree_cap,
            witnesses=self.witnesses,
        )


def certify_prime(p: int, config: CertifierConfig) -> PrimeCertificate:
    """Greenberg verdict for Q(zeta_p)^+ from the index, Vandiver and series stages."""
    check_odd_prime(p)
    parameters = config.parameters()
    record = irregular_indices(p)
    if record.regular:
        return PrimeCertificate(
            p=p,
            regular=True,
            verdict=Verdict.REGULAR_TRIVIAL,
            parameters=parameters,
        )

    outcomes = [vandiver_outcome(p, k, config.witnesses) for k in record.indices]
    vandiver = [
        VandiverRecord(
            k=o.k,
            status=o.status.value,
            witnesses=[WitnessRecord(q=w.q, certified=w.certified) for w in o.witnesses],
        )
        for o in outcomes
    ]
    single = record.index_of_irregularity == 1
    vandiver_holds = single and outcomes[0].status is VandiverStatus.HOLDS
    if single and not vandiver_holds:
        PrintStyle.warning(
            f"p={p}: no Vandiver witness among the first {config.witnesses} primes"
        )

    series = condition2(p, config.level, config.precision, config.degree_cap)
    lam = {k: s.lam for k, s in series.series.items() if s.lam is not None}
    mu = {k: s.mu for k, s in series.series.items() if s.mu is not None}
    c = {k: str(s.c_mod_p) for k, s in series.series.items() if s.c_mod_p is not None}

    failing_stage = None
    if not single:
        verdict = Verdict.NOT_COVERED
    elif not vandiver_holds:
        verdict, failing_stage = Verdict.INDETERMINATE, "vandiver"
    elif series.holds is None:
        verdict, failing_stage = Verdict.INDETERMINATE, "lfunc"
    elif series.holds:
        verdict = Verdict.CERTIFIED_BY_THEOREM_1
    else:
        verdict = Verdict.NOT_COVERED

    return PrimeCertificate(
        p=p,
        regular=False,
        irregular_indices=list(record.indices),
        index_of_irregularity=record.index_of_irregularity,
        vandiver=vandiver,
        lambda_=lam,
        mu=mu,
        c_mod_p=c,
        condition1=vandiver_holds,
        condition2=series.holds if single else None,
        verdict=verdict,
        failing_stage=failing_stage,
        parameters=parameters,
    )


def certify_cached(p: int, config: CertifierConfig) -> PrimeCertificate:
    """certify_prime behind the certificate store unless caching is off."""
    if config.no_cache:
        return certify_prime(p, config)
    cache = CertificateCache(config.cache_dir)
    cert = cache.load(p, config.parameters())
    if cert is None:
        cert = certify_prime(p, config)
        cache.store(cert)
    return cert
