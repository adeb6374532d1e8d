from faker import Factory as FakerFactory

fake = FakerFactory.create("en_US")
fake.seed(777)
