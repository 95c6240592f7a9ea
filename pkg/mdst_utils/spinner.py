"""
Spinner utility for showing progress during long-running experiments.

The spinner writes to stderr and stays silent unless stderr is a terminal,
so result tables on stdout are unaffected.
"""

import sys
import time
import threading
from typing import Optional, TextIO


class Spinner:
    """A simple spinner to show progress during long operations."""

    FRAMES = ['⠋', '⠙', '⠹', '⠸', '⠼', '⠴', '⠦', '⠧', '⠇', '⠏']

    def __init__(self, message: str = "Simulating", stream: Optional[TextIO] = None,
                 enabled: Optional[bool] = None):
        """
        Args:
            message: The message to display alongside the spinner
            stream: Where to draw; stderr by default
            enabled: Force the spinner on or off; by default on only for a terminal
        """
        self.message = message
        self.stream = stream or sys.stderr
        if enabled is None:
            enabled = hasattr(self.stream, 'isatty') and self.stream.isatty()
        self.enabled = enabled
        self.spinning = False
        self.thread: Optional[threading.Thread] = None
        self.frame_index = 0

    def _spin(self):
        while self.spinning:
            frame = self.FRAMES[self.frame_index % len(self.FRAMES)]
            self.stream.write(f'\r{frame} {self.message}...')
            self.stream.flush()
            self.frame_index += 1
            time.sleep(0.1)

    def start(self):
        if self.enabled and not self.spinning:
            self.spinning = True
            self.thread = threading.Thread(target=self._spin)
            self.thread.daemon = True
            self.thread.start()

    def stop(self, final_message: Optional[str] = None, success: bool = True):
        """
        Stop the spinner animation.

        Args:
            final_message: Optional message to display after stopping
            success: Whether the run succeeded (affects the symbol shown)
        """
        if not self.spinning:
            return
        self.spinning = False
        if self.thread:
            self.thread.join()
        self.stream.write('\r' + ' ' * 80 + '\r')
        if final_message:
            symbol = '✓' if success else '✗'
            self.stream.write(f'{symbol} {final_message}\n')
        self.stream.flush()

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.stop(success=exc_type is None)
        return False
