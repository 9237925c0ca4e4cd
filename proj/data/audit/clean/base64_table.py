import base64

import torch

# A lookup table shipped inline; decodes to text, not to machine code.
_TABLE = "VGhpcyBpcyBhIHBsYWluIHRleHQgbG9va3VwIHRhYmxlIHNoaXBwZWQgaW5saW5lIHdpdGggdGhlIGtlcm5lbCBzb3VyY2Uu"


def custom_kernel(x):
    scale = len(base64.b64decode(_TABLE)) / 100.0
    return x * scale
