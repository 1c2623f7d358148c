"""doppel: impersonator screening and bot/fan/genuine post classification.

Library layout follows the pipeline stages: `textprep` and `segmentation`
normalize text, `similarity` issues impersonator verdicts, `clustering`
splits impersonators into bots and fans, `balance` equalizes classes,
`features` builds classifier inputs, `nn` is the from-scratch neural
classifier, `forest`/`evaluation` hold the baseline and the protocol,
`synth` generates calibrated test populations, and `pipeline`/`cli` tie
the stages together.
"""

__version__ = "0.1.0"
