from fractions import Fraction

import factory

from edit_transfer.retrieval import RepoClip

from .style import ContentLabelFactory


class RepoClipFactory(factory.Factory):
    class Meta:
        model = RepoClip

    source_id = factory.Sequence(lambda n: "clip_%03d" % (n + 1))
    duration = 60
    frame_rate = Fraction(25, 1)
    width = 100
    height = 50
    label = factory.SubFactory(ContentLabelFactory)
