"""Euclidean projection onto simplicial cones."""

from ._simplicone import (
    Cone,
    SimpliconeError,
    certify,
    gen_instance,
    monotone_eigenvalues,
    monotone_generator,
    negative_part,
    picard2_monotone,
    positive_part,
    project_monotone_nonneg,
    sign_enumeration_solve,
    solve,
)


def project(generator, z, **kwargs):
    """P_K(z) for K = generator * R^m_+; keyword arguments go to solve()."""
    cone = Cone(generator)
    report = solve(cone, z, **kwargs)
    if report["status"] != "converged":
        raise SimpliconeError(f"solver ended with status {report['status']}")
    return report["projection"]


__all__ = [
    "Cone",
    "SimpliconeError",
    "certify",
    "gen_instance",
    "monotone_eigenvalues",
    "monotone_generator",
    "negative_part",
    "picard2_monotone",
    "positive_part",
    "project",
    "project_monotone_nonneg",
    "sign_enumeration_solve",
    "solve",
]
