"""mjverify - deductive verification for MiniJava with source-level proof interaction.

The pipeline: parse a `.mjava` file (MiniJava code with MiniSpec contract
annotations), generate a proof obligation per method, prove it in a sequent
calculus with symbolic execution, and render any open goal back into the
source as inline assume/assert annotations whose text stays as close as
possible to what the user originally wrote.
"""

__version__ = "0.1.0"
