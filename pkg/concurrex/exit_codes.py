"""
Exit codes for concurrex.
Standardized exit codes for consistent error handling.
"""

class ExitCode:
    """
    Standardized exit codes for concurrex.

    Command-line usage errors (unknown option or command) exit with
    GENERAL_ERROR; an option value the parser rejects exits with
    VALIDATION_FAILURE like any other rejected input.
    """

    # Success
    SUCCESS = 0

    # General errors
    GENERAL_ERROR = 1

    # Input rejected by a validator (bad state, bad params, bad config)
    VALIDATION_FAILURE = 2

    # State / channel / config file could not be parsed
    PARSE_FAILURE = 3

    # A numerical invariant was breached at run time
    INVARIANT_BREACH = 4

    INTERRUPT = 130  # Standard SIGINT code


# Error message templates with suggestions
ERROR_MESSAGES = {
    ExitCode.VALIDATION_FAILURE: {
        "title": "Validation Failed",
        "suggestions": [
            "Check that amplitudes are normalized or relax --tol",
            "Check that dim_a * dim_b matches the matrix size",
            "Family parameters must lie in their documented ranges: concurrex examples"
        ]
    },
    ExitCode.PARSE_FAILURE: {
        "title": "Parse Error",
        "suggestions": [
            "State files need dim_a, dim_b, kind and amps (pure) or rho (mixed)",
            "Complex entries are written as [re, im] pairs",
            "Emit a well-formed file with: concurrex family bell --out bell.json"
        ]
    },
    ExitCode.INVARIANT_BREACH: {
        "title": "Invariant Breach",
        "suggestions": [
            "Re-run with --debug to see the failing comparison",
            "Large or ill-conditioned inputs may need a looser rank cutoff",
            "Please report the command line and seed if this persists"
        ]
    },
}


def get_error_suggestions(exit_code: int) -> dict:
    """
    Get error message and suggestions for an exit code.

    Args:
        exit_code: The exit code

    Returns:
        dict: Error title and suggestions
    """
    return ERROR_MESSAGES.get(exit_code, {
        "title": "Error",
        "suggestions": ["Check the error message above for details"]
    })
