import factory

from edit_transfer.constants import ContentCategory, Transition
from edit_transfer.motion import HomographyTrack
from edit_transfer.shots import Shot
from edit_transfer.style import ContentLabel, ShotStyle


class ContentLabelFactory(factory.Factory):
    class Meta:
        model = ContentLabel

    category = ContentCategory.BACKGROUND
    object_counts = factory.LazyFunction(dict)


class ShotStyleFactory(factory.Factory):
    class Meta:
        model = ShotStyle

    class Params:
        length = 10

    index = 0
    shot = factory.LazyAttribute(lambda o: Shot(0, o.length))
    track = factory.LazyAttribute(lambda o: HomographyTrack.static(len(o.shot)))
    label = factory.SubFactory(ContentLabelFactory)
    speed = 1.0
    brightness = factory.LazyAttribute(lambda o: (128.0,) * len(o.shot))
    transition_in = Transition.HARD_CUT
    width = 100
    height = 50
