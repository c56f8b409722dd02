import dataclasses
import hashlib
import json
import os
from fractions import Fraction

import numpy as np
import pandas as pd

TOOL_VERSION = '0.3.0'

VERDICTS = ('pass', 'fail', 'witness', 'exhausted', 'budget')


def to_jsonable(obj):
    """Convert Fractions, tuples, sets, dataclasses and numpy values to plain JSON types."""
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, float)):
        return obj
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return sorted(to_jsonable(x) for x in obj)
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if hasattr(obj, 'to_dict'):
        return to_jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj):
        return to_jsonable(dataclasses.asdict(obj))
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj):
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(',', ':'), ensure_ascii=False)


def content_hash(obj):
    return 'sha256:' + hashlib.sha256(canonical_json(obj).encode('utf-8')).hexdigest()


def bits_hash(bits):
    """Hash of a pass/fail vector, so exhaustive checks are bit-comparable across runs."""
    return 'sha256:' + hashlib.sha256(bytes(1 if b else 0 for b in bits)).hexdigest()


@dataclasses.dataclass(frozen=True)
class Certificate:
    claim_id: str
    verdict: str
    inputs: dict
    payload: dict
    tool_version: str = TOOL_VERSION
    content_hash: str = ''

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")

    @classmethod
    def make(cls, claim_id, verdict, inputs=None, payload=None):
        body = {
            'claim_id': claim_id,
            'tool_version': TOOL_VERSION,
            'inputs': to_jsonable(inputs or {}),
            'verdict': verdict,
            'payload': to_jsonable(payload or {}),
        }
        return cls(claim_id=claim_id, verdict=verdict, inputs=body['inputs'],
                   payload=body['payload'], content_hash=content_hash(body))

    @property
    def passed(self):
        return self.verdict in ('pass', 'witness', 'exhausted')

    @property
    def incomplete(self):
        return self.verdict == 'budget'

    def body(self):
        return {
            'claim_id': self.claim_id,
            'tool_version': self.tool_version,
            'inputs': self.inputs,
            'verdict': self.verdict,
            'payload': self.payload,
        }

    def recompute_hash(self):
        return content_hash(self.body())

    def to_dict(self):
        d = self.body()
        d['content_hash'] = self.content_hash
        return d

    @classmethod
    def from_dict(cls, data):
        return cls(claim_id=data['claim_id'], verdict=data['verdict'], inputs=data['inputs'],
                   payload=data['payload'], tool_version=data['tool_version'],
                   content_hash=data['content_hash'])


class CertificateBundle:
    """
    Collects certificates in claim order and writes them out.
    One JSON per claim plus bundle.json with the overall status.
    """

    def __init__(self, output_dir='certificates', seed=None, generator=None):
        self.output_dir = output_dir
        self.seed = seed
        self.generator = generator
        self.certificates = []

    def add(self, certificate):
        self.certificates.append(certificate)
        return certificate

    @property
    def first_failure(self):
        for cert in self.certificates:
            if cert.verdict == 'fail':
                return cert.claim_id
        return None

    @property
    def status(self):
        if self.first_failure is not None:
            return 'fail'
        if any(cert.incomplete for cert in self.certificates):
            return 'incomplete'
        return 'pass'

    def summary(self):
        return {
            'status': self.status,
            'first_failure': self.first_failure,
            'seed': self.seed,
            'generator': self.generator,
            'claims': [
                {'claim_id': c.claim_id, 'verdict': c.verdict, 'content_hash': c.content_hash}
                for c in self.certificates
            ],
        }

    def save_to_json(self):
        """Write every certificate and bundle.json; returns the written paths."""
        os.makedirs(self.output_dir, exist_ok=True)
        paths = []
        for cert in self.certificates:
            path = os.path.join(self.output_dir, f"{cert.claim_id}.json")
            with open(path, 'w') as f:
                json.dump(cert.to_dict(), f, indent=2, sort_keys=True)
                f.write('\n')
            paths.append(path)
        path = os.path.join(self.output_dir, 'bundle.json')
        with open(path, 'w') as f:
            json.dump(to_jsonable(self.summary()), f, indent=2, sort_keys=True)
            f.write('\n')
        paths.append(path)
        return paths


def save_to_csv(rows, path):
    """Save a list of flat dicts (e.g. a Q ladder) to CSV via pandas."""
    if not rows:
        return None
    frame = pd.DataFrame([to_jsonable(r) for r in rows])
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    frame.to_csv(path, index=False)
    return path


def load_certificate(path):
    with open(path) as f:
        return Certificate.from_dict(json.load(f))
