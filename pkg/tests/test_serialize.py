import json
import random

import pytest

from profsite.corpus import registry_for, stability_instances, standard_towers
from profsite.serialize import decode_certificate, decode_morphism, encode_certificate, encode_morphism, recheck_certificate
from profsite.site import CertificateError, hom, stability_refine

TOWERS = standard_towers()


@pytest.mark.parametrize("name", sorted(TOWERS))
def test_certificate_round_trip(name):
    t = TOWERS[name]
    for case, cover, g in stability_instances(t, random.Random(2), 1):
        cert = stability_refine(cover, g)
        data = json.loads(json.dumps(encode_certificate(cert)))
        back = decode_certificate(data, t)
        assert back.case == case
        assert back.refined.members == cert.refined.members
        recheck_certificate(data, t)


def test_morphism_round_trip(c2):
    reg = registry_for(c2)
    for A in reg:
        for B in reg:
            for f in hom(A, B):
                assert decode_morphism(json.loads(json.dumps(encode_morphism(f))), c2) == f


def test_recheck_catches_tampering(c2):
    _, cover, g = next(x for x in stability_instances(c2, random.Random(4), 1) if x[0] == "4b")
    data = encode_certificate(stability_refine(cover, g))
    data["morphism"]["value"] = (data["morphism"]["value"] + 1) % len(data["cover"]["codomain"]["table"][0])
    with pytest.raises(CertificateError):
        recheck_certificate(data, c2)
