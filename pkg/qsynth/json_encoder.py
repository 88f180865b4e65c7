import json

import attr
import numpy as np

from . import timing


class JSONEncoder(json.JSONEncoder):
    def default(self, o):
        if isinstance(o, timing.Timing):
            return o.to_json_compat()
        if attr.has(type(o)):
            return attr.asdict(o)
        if isinstance(o, np.ndarray):
            if np.iscomplexobj(o):
                return np.stack([o.real, o.imag], axis=-1).tolist()
            return o.tolist()
        if isinstance(o, np.complexfloating):
            return [float(o.real), float(o.imag)]
        if isinstance(o, np.generic):
            return o.item()
        return super().default(o)
