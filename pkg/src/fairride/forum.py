"""Community forum: topics, location subforums, posts, and one-vote polls.

Config polls carry a proposed dispatch-config change; closing one emits
the proposal as data for an operator to apply — the poll never mutates
live config by itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime


class UnknownTopic(KeyError):
    pass


class UnknownPoll(KeyError):
    pass


class PollClosed(Exception):
    pass


class InvalidOption(ValueError):
    pass


@dataclass
class Topic:
    topic_id: str
    title: str
    creator: str
    location_tag: str | None
    created_at: datetime


@dataclass
class Post:
    post_id: str
    topic_id: str
    author: str
    body: str
    created_at: datetime


@dataclass
class Poll:
    poll_id: str
    question: str
    options: tuple[str, ...]
    creator: str
    created_at: datetime
    open: bool = True
    votes: dict[str, str] = field(default_factory=dict)  # driver -> option
    config_proposal: dict | None = None


class Forum:
    def __init__(self):
        self.topics: dict[str, Topic] = {}
        self.posts: dict[str, list[Post]] = {}
        self.polls: dict[str, Poll] = {}

    def create_topic(
        self,
        creator: str,
        title: str,
        clock: datetime,
        location_tag: str | None = None,
        topic_id: str | None = None,
    ) -> Topic:
        topic = Topic(
            topic_id=topic_id or f"topic-{len(self.topics) + 1}",
            title=title,
            creator=creator,
            location_tag=location_tag,
            created_at=clock,
        )
        self.topics[topic.topic_id] = topic
        self.posts[topic.topic_id] = []
        return topic

    def add_post(
        self, author: str, topic_id: str, body: str, clock: datetime, post_id: str | None = None
    ) -> Post:
        if topic_id not in self.topics:
            raise UnknownTopic(topic_id)
        post = Post(
            post_id=post_id or f"post-{topic_id}-{len(self.posts[topic_id]) + 1}",
            topic_id=topic_id,
            author=author,
            body=body,
            created_at=clock,
        )
        self.posts[topic_id].append(post)
        return post

    def subforum(self, location_tag: str | None) -> list[Topic]:
        """Topics for one location, or the untagged general board."""
        return [t for t in self.topics.values() if t.location_tag == location_tag]

    def create_poll(
        self,
        creator: str,
        question: str,
        options: list[str],
        clock: datetime,
        config_proposal: dict | None = None,
        poll_id: str | None = None,
    ) -> Poll:
        if len(options) < 2 or len(set(options)) != len(options):
            raise InvalidOption("polls need at least two distinct options")
        poll = Poll(
            poll_id=poll_id or f"poll-{len(self.polls) + 1}",
            question=question,
            options=tuple(options),
            creator=creator,
            created_at=clock,
            config_proposal=config_proposal,
        )
        self.polls[poll.poll_id] = poll
        return poll

    def vote(self, driver_id: str, poll_id: str, option: str) -> Poll:
        """One vote per driver; a revote replaces the previous choice."""
        if poll_id not in self.polls:
            raise UnknownPoll(poll_id)
        poll = self.polls[poll_id]
        if not poll.open:
            raise PollClosed(poll_id)
        if option not in poll.options:
            raise InvalidOption(f"poll {poll_id!r} has no option {option!r}")
        poll.votes[driver_id] = option
        return poll

    def tally(self, poll_id: str) -> dict[str, int]:
        poll = self.polls[poll_id]
        counts = {option: 0 for option in poll.options}
        for option in poll.votes.values():
            counts[option] += 1
        return counts

    def close_poll(self, poll_id: str) -> dict | None:
        """Close voting; for config polls, return the proposed change event.

        The proposal names the winning option alongside the tally so the
        operator action stays auditable.
        """
        if poll_id not in self.polls:
            raise UnknownPoll(poll_id)
        poll = self.polls[poll_id]
        poll.open = False
        if poll.config_proposal is None:
            return None
        counts = self.tally(poll_id)
        winner = max(poll.options, key=lambda o: (counts[o], o))
        return {
            "poll_id": poll_id,
            "question": poll.question,
            "winning_option": winner,
            "tally": counts,
            "proposal": poll.config_proposal,
        }
