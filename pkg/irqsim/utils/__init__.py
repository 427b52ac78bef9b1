from irqsim.utils.files import write_text_atomic

__all__ = ['write_text_atomic']
